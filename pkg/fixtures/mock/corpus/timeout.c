// T: mock, timeout  V: 1.0
// MOCK-RUN: sleep 3
int main(){ for(;;); }
