#pragma acc parallel loop present(a[0:n], \
  b[0:n], c[0:n]) async(1)
for (int x = 0; x < n; ++x){
  c[x] = a[x] + b[x];
}
#pragma acc parallel loop present(d[0:n], \
  e[0:n], f[0:n]) async(2)
for (int x = 0; x < n; ++x){
  f[x] = d[x] + e[x];
}
#pragma acc parallel loop present(c[0:n], \
  f[0:n], g[0:n]) async(3) wait(1, 2)
for (int x = 0; x < n; ++x){
  g[x] = c[x] + f[x];
}
