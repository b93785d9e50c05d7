#include <pybind11/pybind11.h>
PYBIND11_MODULE(ivnsim, m) { m.doc() = "stub"; }
