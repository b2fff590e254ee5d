int test1(){
    int err = 0;
    srand(SEED);
    int device_num = acc_get_device_num(acc_get_device_type());
    #pragma acc init device_num(device_num)
    return err;}
