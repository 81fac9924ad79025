#include <cstdio>
int main() { std::puts("su11: placeholder"); return 0; }
