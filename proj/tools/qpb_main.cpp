#include <cstdio>

int main() {
  std::puts("qpb: command-line interface not wired up yet");
  return 2;
}
