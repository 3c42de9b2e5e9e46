#include <cstdio>

int main() {
    std::puts("semjscc cli placeholder");
    return 0;
}
