// T: acc_init, device_type  V: 2.5
#include <openacc.h>

int test1(){
    int err = 0;
    #pragma acc init device_type(host)
    #pragma acc init device_type(multicore)
    #pragma acc init device_type(default)
    #pragma acc init device_type(nvidia)
    return err;
}

int main(){
    return test1() != 0;
}
