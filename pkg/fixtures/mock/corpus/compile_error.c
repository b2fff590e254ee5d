// T: mock, compile-error  V: 1.0
// MOCK-COMPILE: fail unknown directive
int main(){ return 0; }
