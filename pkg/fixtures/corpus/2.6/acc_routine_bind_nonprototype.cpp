// T: routine, bind  V: 2.6
typedef double real_t;
#define n 1024

#pragma acc routine vector bind("device_array_array")
real_t host_array_array(real_t *a, long long len){
    real_t returned = 0.0;
    #pragma acc loop reduction(+:returned)
    for (int x = 0; x < len; ++x)
        returned += a[x];
    return returned;
}

int main(){
    real_t a[n];
    for (int x = 0; x < n; ++x)
        a[x] = 1.0;
    return host_array_array(a, n) == 0.0;
}
