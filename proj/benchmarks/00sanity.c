//! direction: le
void before() {
  foo();
  bar();
}
void after() {
  foo();
  bar();
}
