#include <cstdio>
int main() { std::puts("command-line tool not implemented yet"); return 64; }
