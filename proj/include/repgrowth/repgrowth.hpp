#pragma once

#include "repgrowth/alphabet.hpp"
#include "repgrowth/coupling.hpp"
#include "repgrowth/io.hpp"
#include "repgrowth/normalization.hpp"
#include "repgrowth/oracle.hpp"
#include "repgrowth/random.hpp"
#include "repgrowth/reducibility.hpp"
#include "repgrowth/report.hpp"
#include "repgrowth/spectral.hpp"
#include "repgrowth/sweep.hpp"
#include "repgrowth/system.hpp"
#include "repgrowth/transfer.hpp"
#include "repgrowth/types.hpp"
