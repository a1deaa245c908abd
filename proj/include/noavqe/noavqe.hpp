#pragma once

#include "noavqe/core.hpp"
#include "noavqe/hamiltonian.hpp"
#include "noavqe/pauli.hpp"
#include "noavqe/simulator.hpp"
#include "noavqe/ansatz.hpp"
#include "noavqe/cobyla.hpp"
#include "noavqe/vqe.hpp"
#include "noavqe/noization.hpp"
#include "noavqe/adapt.hpp"
#include "noavqe/oracle.hpp"
#include "noavqe/io.hpp"
#include "noavqe/experiment.hpp"
