import os
import sys
import unittest

import llweave

SKI = os.environ.get("LLWEAVE_SKI_DATA", os.path.join(os.path.dirname(__file__), "..", "..", "data", "ski"))


def read(name):
    with open(os.path.join(SKI, name)) as f:
        return f.read()


class Formulas(unittest.TestCase):
    def test_parse_print_negate(self):
        f = llweave.Formula("(A * B) + C^")
        self.assertEqual(str(f.negate().negate()), str(f))
        self.assertEqual(f.negate(), llweave.Formula(str(f.negate())))
        self.assertNotEqual(f.negate(), f)
        self.assertFalse(f.is_atom)
        self.assertEqual(len({llweave.Formula("A"), llweave.Formula("A")}), 1)

    def test_bad_formula_raises_with_code(self):
        with self.assertRaises(llweave.LlweaveError) as ctx:
            llweave.Formula("A * ")
        self.assertEqual(ctx.exception.code, "syntax")


class Kernel(unittest.TestCase):
    def test_axiom_and_cut(self):
        a = llweave.Formula("A")
        left = llweave.ax(a, "x", "y")
        right = llweave.ax(a, "u", "v")
        t = llweave.cut(left, right, "y", "u")
        self.assertEqual({c for c, _ in t.sequent.entries}, {"x", "v"})
        self.assertEqual(t.rule_counts["Cut"], 1)
        self.assertTrue(t.process.free_names <= {"x", "v"})

    def test_rule_side_condition(self):
        a = llweave.ax(llweave.Formula("A"), "x", "y")
        with self.assertRaises(llweave.LlweaveError):
            llweave.cut(a, a, "x", "x")

    def test_identity_expand(self):
        t = llweave.identity_expand(llweave.Formula("A * (B & C)"), "x", "y")
        self.assertEqual(len(t.sequent), 2)
        self.assertEqual(t.rule_counts["Id"], 3)
        self.assertIn(llweave.proof(t)["rule"], {"Par", "Tensor"})


class Processes(unittest.TestCase):
    def test_congruence_and_substitution(self):
        p = llweave.Process("x<a>.0 | y(b).0")
        q = llweave.Process("y(b).0 | x<a>.0 | 0")
        self.assertTrue(p.congruent(q))
        self.assertEqual(p.free_names, {"x", "a", "y"})
        r = p.substitute({"x": "z"})
        self.assertIn("z", r.free_names)
        self.assertEqual(llweave.Process("x<a>.0 | x(b).0").redex_count(), 1)


class Composition(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.registry = llweave.load_registry(read("registry.txt"))
        cls.request = llweave.load_request(read("request.txt"))
        cls.result = llweave.compose(cls.registry, cls.request)

    def test_proof(self):
        counts = self.result.theorem.rule_counts
        self.assertEqual(counts["Axiom"], 5)
        self.assertGreaterEqual(counts["Cut"], 3)
        self.assertEqual(len(self.result.services_used), 5)
        self.assertEqual(self.result.theorem.process.free_names,
                         set(self.result.theorem.sequent.channels))

    def test_simulation_terminates(self):
        main = llweave.assemble(self.result.theorem.process, llweave.client(self.request),
                                llweave.stubs_for(self.registry))
        trace = llweave.run(main)
        self.assertEqual(trace["terminal"], "terminated")
        self.assertGreater(len(trace["events"]), 10)
        again = llweave.run(main, policy="random", seed=3)
        self.assertEqual(again["terminal"], "terminated")

    def test_step_session(self):
        main = llweave.assemble(self.result.theorem.process, llweave.client(self.request),
                                llweave.stubs_for(self.registry))
        s = llweave.StepSession(main)
        state = s.state()
        self.assertEqual(state["step_index"], 0)
        after = s.step(state["enabled"][0]["id"])
        self.assertEqual(after["step_index"], 1)
        self.assertEqual(s.step(999)["error"], "invalid-redex-id")
        self.assertEqual(s.reset()["digest"], state["digest"])

    def test_unreachable_goal(self):
        goal = llweave.ServiceSpec("Nothing", inputs=["HEIGHT_CM"], outputs=["WARRANTY"])
        with self.assertRaises(llweave.LlweaveError) as ctx:
            llweave.compose(self.registry, goal, max_depth=6)
        self.assertEqual(ctx.exception.code, "not-composable")


if __name__ == "__main__":
    unittest.main(argv=[sys.argv[0]] + sys.argv[1:])
