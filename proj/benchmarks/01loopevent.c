//! direction: le
void before(int n) {
  while (n > 0) {
    tick();
    n = n - 1;
  }
}
void after(int n) {
  while (n > 0) {
    tick();
    audit();
    n = n - 1;
  }
}
