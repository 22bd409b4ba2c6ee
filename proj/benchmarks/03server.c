//! direction: le
void before(int x, int l, int mode) {
  setup();
  while (x > 0) {
    m = recv();
    if (l) log(m);
    if (mode > 0) { stats(m); }
    if (m > 0) {
      n = constructReply();
      encode(n);
      send(n);
      if (l) log(n);
    } else {
      nack();
    }
    x--;
  }
  teardown();
}
void after(int x, int mode) {
  setup();
  while (x > 0) {
    m = recv();
    if (mode > 0) { stats(m); }
    if (m > 0) {
      auth = check(m);
      if (auth > 0) {
        n = constructReply();
        encode(n);
        send(n);
      } else { reject(m); }
    } else {
      nack();
      log(m);
    }
    x--;
  }
  teardown();
}
