// T: routine, bind, reduction  V: 2.6
#include <cstdlib>
typedef double real_t;
#define n 1024

real_t host_array_array(real_t *a, long long len);
#pragma acc routine(host_array_array) vector bind(device_array_array)

real_t host_array_array(real_t *a, long long len){
    real_t returned = 0.0;
    #pragma acc loop reduction(+:returned)
    for (int x = 0; x < len; ++x)
        returned += a[x];
    return returned;
}

real_t device_array_array(real_t *a, long long len){
    real_t returned = 0.0;
    #pragma acc loop reduction(-:returned)
    for (int x = 0; x < len; ++x)
        returned -= a[x];
    return returned;
}

int main(){
    real_t a[n];
    for (int x = 0; x < n; ++x)
        a[x] = 1.0;
    return host_array_array(a, n) == 0.0;
}
