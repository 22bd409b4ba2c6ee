//! direction: eq
void before(int x) {
  if (x > 0) { emit(); }
}
void after(int x) {
  if (x >= 1) { emit(); }
}
