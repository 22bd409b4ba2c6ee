//! direction: le
void before() {
  a = nondet();
  if (a > 0) {
    send();
    recv();
  }
}
void after() {
  a = nondet();
  if (a > 0) {
    send();
  }
  recv();
}
