//! direction: le
void before(int x) {
  if (x > 0) { evA(); } else { evB(); }
}
void after(int x) {
  evA();
}
