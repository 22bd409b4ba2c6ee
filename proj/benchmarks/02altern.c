//! direction: le
void before(int a) {
  if (a > 0) { evA(); evB(); } else { evB(); evA(); }
}
void after(int a) {
  if (a > 0) { evA(); evB(); } else { evA(); evB(); }
}
