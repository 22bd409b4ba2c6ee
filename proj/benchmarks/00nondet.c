//! direction: le
void before() {
  i = nondet();
  if (i > 0) { evB(); } else { evC(); }
  evD();
}
void after() {
  i = nondet();
  if (i > 0) { evB(); } else { evC(); }
  evD();
}
