// T: mock, fail  V: 1.0
// MOCK-RUN: exit 1
int main(){ return 1; }
