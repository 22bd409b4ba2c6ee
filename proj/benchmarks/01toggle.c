//! direction: le
void before(int x) {
  while (x > 0) {
    ping();
    x--;
  }
}
void after(int x, int t) {
  while (x > 0) {
    if (t > 0) { ping(); } else { ping(); probe(); }
    x--;
  }
}
