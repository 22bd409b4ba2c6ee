//! direction: le
void before(int n) {
  acquire();
  while (true) {
    n = n + 1;
  }
  release();
}
void after(int n) {
  acquire();
  while (n > 0) {
    n = n - 1;
  }
  release();
}
