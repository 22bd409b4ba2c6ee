//! direction: le
void before(int b) {
  if (b > 0) { m1(); }
  m4();
  m11();
  m14();
}
void after() {
  m1();
  m4();
  m11();
  m14();
}
