// T: serial, loop, copy  V: 2.6
#define n 256

int main(){
    int a[n];
    int err = 0;
    for (int x = 0; x < n; ++x)
        a[x] = x;
    #pragma acc serial loop copy(a[0:n])
    for (int x = 0; x < n; ++x)
        a[x] += 1;
    for (int x = 0; x < n; ++x)
        if (a[x] != x + 1)
            err += 1;
    return err != 0;
}
