// T: acc_init, if  V: 3.0
#include <openacc.h>
#include <stdio.h>

int test1(){
    int err = 0;
    int device_num = acc_get_device_num(acc_get_device_type());
    #pragma acc init if(device_num == device_num)
    return err;
}

int main(){
    int failed = test1();
    printf("%s\n", failed ? "FAIL" : "PASS");
    return failed;
}
