//! direction: le
void before(int x) {
  while (x > 0) {
    work();
    x--;
  }
  done();
}
void after(int x) {
  while (x > 0) {
    work();
    sync();
    x--;
  }
  done();
}
