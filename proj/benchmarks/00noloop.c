//! direction: le
void before(int count) {
  while (count > 4) {
    count = count + 1;
    evA();
  }
}
void after(int count) {
  while (count > 4) {
    evA();
    count = count + 1;
  }
}
