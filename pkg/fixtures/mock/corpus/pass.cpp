// T: mock, pass  V: 2.0
// MOCK-RUN: exit 0
int main(){ return 0; }
