//! direction: le
void before(int x) {
  if (x > 0) evA(); else evB();
}
void after() {
  t = nondet();
  if (t > 0) evB(); else evA();
}
