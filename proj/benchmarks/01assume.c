//! direction: le
void before(int d) {
  assume(d == 0);
  c = d;
  if (c == 0) execB(); else execD();
}
void after() {
  execB();
}
