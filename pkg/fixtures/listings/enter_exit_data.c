#pragma acc enter data copyin(data[0:n])
#pragma acc parallel loop present(a[0:n]) reduction(+:total)
for (int x = 0; x < n; ++x){
  a[x] = a[x] * 2;
  total += a[x];
}
if (total < n){
  //Conditionally updates data
  #pragma acc exit data copyout(data[0:n])
}
else {
  #pragma acc exit data delete(data[0:n])
}
