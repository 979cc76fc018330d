#include <cstdio>

int main() {
  std::puts("chainalg: subcommands not wired up yet");
  return 2;
}
