/* T: enter data, exit data, copyin, copyout, delete  V: 2.0 */
#include <stdlib.h>
#define n 1024

int test1(){
    int err = 0;
    int total = 0;
    int *a = malloc(n * sizeof(int));
    for (int x = 0; x < n; ++x)
        a[x] = 1;
    #pragma acc enter data copyin(a[0:n])
    #pragma acc parallel loop present(a[0:n]) reduction(+:total)
    for (int x = 0; x < n; ++x){
        a[x] = a[x] * 2;
        total += a[x];
    }
    if (total < n){
        #pragma acc exit data copyout(a[0:n])
    }
    else {
        #pragma acc exit data delete(a[0:n])
    }
    if (total != 2 * n)
        err += 1;
    free(a);
    return err;
}

int main(){
    return test1() != 0;
}
