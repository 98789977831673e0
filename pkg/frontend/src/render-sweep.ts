#!/usr/bin/env node
import { runSweep } from "./cli";

process.exit(runSweep(process.argv.slice(2)));
