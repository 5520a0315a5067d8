#pragma once

// Umbrella header for the network-assisted self-testing toolkit.

#include "netcert/common.hpp"
#include "netcert/layout.hpp"
#include "netcert/state.hpp"
#include "netcert/tensor_ops.hpp"
#include "netcert/spectra.hpp"
#include "netcert/states.hpp"
#include "netcert/gates.hpp"
#include "netcert/scenario.hpp"
#include "netcert/model.hpp"
#include "netcert/behavior.hpp"
#include "netcert/certifier.hpp"
#include "netcert/extraction.hpp"
#include "netcert/tomography.hpp"
#include "netcert/adversary.hpp"
