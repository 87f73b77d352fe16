// Single translation unit compiling the amalgamated Catch2 implementation.
#include <catch2/catch_amalgamated.cpp>
