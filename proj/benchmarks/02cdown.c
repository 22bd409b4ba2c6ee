//! direction: le
void before(int n) {
  while (n > 0) {
    step();
    n = n - 1;
  }
  finish();
}
void after(int n) {
  while (n > 0) {
    step();
    n = n - 2;
  }
  finish();
}
