// T: mock, pass  V: 1.0
// MOCK-RUN: exit 0
int main(){ return 0; }
