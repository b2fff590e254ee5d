int pow(int base, int exponent){
  returned = 1;
  for (int x = 0; x < exponent - 1; ++x){
    returned = returned * base;
  }
  return returned;
}
#pragma acc routine(pow) seq
#pragma acc parallel loop present(a[0:n])
for (int x = 0; x < n; ++x){ 
  a[x] = pow(a[x], 2);
}
