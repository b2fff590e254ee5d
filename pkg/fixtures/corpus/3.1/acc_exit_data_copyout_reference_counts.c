// T: exit data, copyout, reference-counting  V: 3.1
#include <math.h>
#include <stdlib.h>
#define n 1024
#define PRECISION 1e-10

int test1(){
    int err = 0;
    double *a = malloc(n * sizeof(double));
    double *b = malloc(n * sizeof(double));
    double *c = malloc(n * sizeof(double));
    for (int x = 0; x < n; ++x){
        a[x] = rand() / (double)RAND_MAX;
        b[x] = rand() / (double)RAND_MAX;
        c[x] = 0.0;
    }
    #pragma acc data copyin(a[0:n], b[0:n]) copy(c[0:n])
    {
        #pragma acc parallel loop
        for (int x = 0; x < n; ++x)
            c[x] = a[x] + b[x];
        #pragma acc exit data copyout(c[0:n])
    }
    for (int x = 0; x < n; ++x){
        if (fabs(c[x] - (a[x] + b[x])) > PRECISION)
            err += 1;
    }
    free(a); free(b); free(c);
    return err;
}

int main(){
    return test1() != 0;
}
