//! direction: le
//! protect: evA, evB
void before() {
  evA();
}
void after() {
  evB();
}
