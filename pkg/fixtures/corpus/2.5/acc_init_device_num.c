// T: acc_init, device_num  V: 2.5
#include <openacc.h>

int test1(){
    int err = 0;
    int device_num = acc_get_device_num(acc_get_device_type());
    #pragma acc init device_num(device_num)
    return err;
}

int main(){
    return test1() != 0;
}
