//! direction: le
void before(int p, int q) {
  if (p > 0) {
    if (q > 0) { evA(); } else { evB(); }
  } else {
    evC();
  }
}
void after(int p) {
  if (p > 0) { evA(); } else { evC(); }
}
