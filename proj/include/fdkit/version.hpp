#pragma once

#define FDKIT_VERSION "0.1.0"
