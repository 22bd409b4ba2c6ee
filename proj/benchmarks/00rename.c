//! direction: eq
void before(int x) {
  if (x > 0) foo(); else bar();
}
void after(int y) {
  if (y > 0) foo(); else bar();
}
