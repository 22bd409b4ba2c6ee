//! direction: le
void before() {
}
void after() {
  eventA();
}
