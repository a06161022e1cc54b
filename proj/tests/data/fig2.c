void f() {
    int x;
    x = 50;
    for (int i = 0; i < 50; i++) {
        if (x > 50) {
        } else {
        }
    }
}
