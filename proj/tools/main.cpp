#include <cstdio>
int main() { std::puts("dulac cli placeholder"); }
