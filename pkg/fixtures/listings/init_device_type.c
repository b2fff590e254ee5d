 int test1(){
    int err = 0;
    srand(SEED);
    #pragma acc init device_type(host)
    #pragma acc init device_type(multicore)
    #pragma acc init device_type(default)
    #pragma acc init device_type(nvidia)
    return err;}
