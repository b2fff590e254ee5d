#pragma acc routine vector bind("device_array_array")
real_t host_array_array(real_t * a, long long n){
    #pragma acc loop reduction(+:returned)
    real_t returned = 0.0;
    for (int x = 0; x < n; ++x)
        returned += a[x];
    return returned;
}
auto device_array_array = [](real_t * a, long long n){
    real_t returned = 0.0;
    #pragma acc loop reduction(-:returned)
    for (int x = 0; x < n; ++x)
        returned -= a[x];
    return returned;
};
