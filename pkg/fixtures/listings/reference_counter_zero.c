#pragma acc data copyin(a[0:n], b[0:n]) copy(c[0:n])
    #pragma acc parallel loop
    for (int x = 0; x < n; ++x)
        c[x] = a[x] + b[x];
#pragma acc exit data copyout(c[0:n])
for (int x = 0; x < n; ++x){
    if (fabs(c[x] - (a[x] + b[x])) > PRECISION)
        err += 1;
}
