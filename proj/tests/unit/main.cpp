#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include "semiwig/states.hpp"

int main(int argc, char** argv) {
  semiwig::set_warning_sink([](const std::string&) {});
  doctest::Context ctx(argc, argv);
  return ctx.run();
}
