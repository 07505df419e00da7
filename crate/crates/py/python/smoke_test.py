"""Load the compiled extension and exercise each binding once.

Build first with `cargo build -p valmono-py --features extension-module`,
or point VALMONO_LIB at the shared library.
"""

import importlib.machinery
import importlib.util
import json
import os
import pathlib
import sys


def load():
    root = pathlib.Path(__file__).resolve().parents[3]
    path = os.environ.get("VALMONO_LIB") or str(root / "target" / "debug" / "libvalmono.so")
    loader = importlib.machinery.ExtensionFileLoader("valmono", path)
    spec = importlib.util.spec_from_file_location("valmono", path, loader=loader)
    module = importlib.util.module_from_spec(spec)
    loader.exec_module(module)
    return module


def main():
    vm = load()
    keyed = vm.Spec.builtin("keyed")
    assert keyed.rank() == 2
    assert keyed.epsilon("z^2 - x^2*y") == ("(1, -1 - pi)", 1)
    assert keyed.value("z^2 - x^2*y") == "(1, 0)"
    assert keyed.truncated_value("z", "z^2 - x^2*y")[0] == "(0, 2 + 2*pi)"
    assert keyed.is_immediate_successor("z", "z^2 - x^2*y")
    assert not keyed.is_immediate_successor("z", "z^2 - x*y")

    weights = vm.Spec.from_json(vm.Spec.builtin("weights").to_json())
    key, cert = weights.next_successor("z")
    assert "z^2" in key and json.loads(cert)["alpha"] == 2

    state = vm.State(keyed)
    cert = json.loads(state.monomialize("z^2 - x^2*y"))
    assert cert["residue"] == "1" and state.blowups() > 0
    again = vm.State.from_json(state.to_json())
    assert again.params() == state.params()
    assert len(again.trace_jsonl().splitlines()) == state.blowups()

    order, certs = vm.State(weights).uniformize(["x + y", "x"])
    assert sorted(order) == [0, 1] and len(certs) == 2

    try:
        keyed.value("z^2 +")
    except ValueError:
        pass
    else:
        raise AssertionError("bad input accepted")
    print("smoke test passed")


if __name__ == "__main__":
    sys.exit(main())
