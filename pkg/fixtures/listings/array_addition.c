int main(){
    int N = 1<<20;
    ***Variable Declaration***
    for (int x = 0; x < N; ++x){a[x] = 10;b[x] = 15;}
    #pragma acc data copyin(a[0:N], b[0:N]) copyout(c[0:N])
        for (int x = 0; x < 1 << 14; ++x){
            #pragma acc parallel loop independent
            for (int y = 0; y < N; ++y)
                c[y] = a[y] + b[y];
}       }
