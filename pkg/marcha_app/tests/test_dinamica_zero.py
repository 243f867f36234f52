"""
Tests for the zero dynamics and the target orbit.
"""
import numpy as np
from django.test import SimpleTestCase
from scipy.integrate import solve_ivp

from marcha_app.core.excecoes import ExcecaoDadosInvalidos, ExcecaoOrbitaInviavel
from marcha_app.services.servico_controle import ServicoControle
from marcha_app.services.servico_dinamica_zero import ServicoDinamicaZero
from marcha_app.tests.auxiliares import configuracao_padrao, marcha_refinada, preparo_padrao


class ServicoDinamicaZeroTest(SimpleTestCase):
    """Tests for ServicoDinamicaZero."""

    def setUp(self):
        """Set up test data."""
        self.configuracao = configuracao_padrao()
        self.bipede = self.configuracao.bipede
        self.marcha = marcha_refinada()
        self.orbita = preparo_padrao().orbita
        self.dinamica_zero = self.orbita.dinamica_zero

    def test_integrais_na_origem(self):
        """Test Psi(0) = 1 and P(0) = 0."""
        psi, potencial = self.dinamica_zero.integrais(0.0)
        self.assertAlmostEqual(psi, 1.0, places=14)
        self.assertAlmostEqual(potencial, 0.0, places=14)

    def test_paridade_de_psi_e_p(self):
        """Test Psi and P are even in q2."""
        for q2 in (0.1, 0.25, np.pi / 8, 0.45):
            psi_positivo, p_positivo = self.dinamica_zero.integrais(q2)
            psi_negativo, p_negativo = self.dinamica_zero.integrais(-q2)
            self.assertAlmostEqual(psi_positivo, psi_negativo, delta=1e-8)
            self.assertAlmostEqual(p_positivo, p_negativo, delta=1e-8)

    def test_alfas_contra_modelo_completo(self):
        """Test alpha1 + alpha2 equals the full-model ddq2 on the manifold with dq2 = 1."""
        for q2 in (-0.3, 0.0, 0.2, np.pi / 8):
            alfa1, alfa2 = ServicoDinamicaZero.coeficientes_alfa(self.marcha, self.bipede, q2)
            estado = ServicoDinamicaZero.levantar_para_variedade(self.marcha, q2, 1.0)
            derivada = ServicoControle.dinamica_malha_fechada(
                self.marcha, self.bipede, self.configuracao.ganhos, estado.como_vetor()
            )
            self.assertAlmostEqual(derivada[-1], alfa1 + alfa2, delta=1e-7, msg=f"Failed for q2: {q2}")

    def test_integral_de_movimento_conservada(self):
        """Test E stays at c* along one swing of the zero dynamics."""
        def campo(t, y):
            alfa1, alfa2 = ServicoDinamicaZero.coeficientes_alfa(self.marcha, self.bipede, y[0])
            return [y[1], alfa1 + alfa2 * y[1] ** 2]

        def fim_do_passo(t, y):
            return y[0] + np.pi / 8
        fim_do_passo.terminal = True

        solucao = solve_ivp(
            campo, (0.0, 2.0), list(self.orbita.ancora), method='DOP853',
            rtol=1e-12, atol=1e-12, events=fim_do_passo,
        )
        self.assertEqual(solucao.status, 1)
        for q2, dq2 in solucao.y.T:
            energia, _ = ServicoDinamicaZero.energia_e_potencial(self.dinamica_zero, q2, dq2)
            self.assertAlmostEqual(energia, self.orbita.c_estrela, delta=1e-7)

    def test_orbita_alvo(self):
        """Test the target orbit through the anchor is feasible."""
        self.assertGreater(self.orbita.c_estrela, self.orbita.potencial_max)
        self.assertLessEqual(self.orbita.potencial_min, self.orbita.potencial_max)
        self.assertGreaterEqual(self.orbita.potencial_max, self.dinamica_zero.integrais(0.0)[1] - 1e-12)
        self.assertAlmostEqual(
            ServicoDinamicaZero.velocidade_orbita(self.orbita, np.pi / 8), -5 * np.pi / 3, places=10
        )

    def test_extremos_refinados(self):
        """Test potential extrema do not depend on the grid."""
        grossos = ServicoDinamicaZero.extremos_potencial(self.dinamica_zero, 1001)
        finos = ServicoDinamicaZero.extremos_potencial(self.dinamica_zero, 4001)
        self.assertAlmostEqual(grossos[0], finos[0], delta=1e-8)
        self.assertAlmostEqual(grossos[1], finos[1], delta=1e-8)

    def test_orbita_inviavel(self):
        """Test an anchor at rest on top of the potential is infeasible."""
        tabela = ServicoDinamicaZero.amostrar(self.dinamica_zero)
        topo = float(tabela[np.argmax(tabela[:, 4]), 0])
        with self.assertRaises(ExcecaoOrbitaInviavel):
            ServicoDinamicaZero.construir_orbita(self.dinamica_zero, (topo, 0.0))

    def test_intervalo_sem_origem(self):
        """Test the interval must contain q2 = 0."""
        with self.assertRaises(ExcecaoDadosInvalidos):
            ServicoDinamicaZero.construir_dinamica_zero(self.marcha, self.bipede, (0.1, 0.5))

    def test_ponto_fora_do_intervalo(self):
        """Test evaluation outside the operating interval."""
        with self.assertRaises(ExcecaoDadosInvalidos):
            ServicoDinamicaZero.energia_e_potencial(self.dinamica_zero, 1.0, -1.0)

    def test_conservacao_de_energia_nos_extremos(self):
        """Test the energy-conserving conditions at q2 = +-theta1_i."""
        verificacoes = ServicoDinamicaZero.verificar_conservacao_energia(self.orbita)
        self.assertEqual(len(verificacoes), 3)
        for verificacao in verificacoes:
            self.assertTrue(verificacao.aprovado, f"{verificacao.nome}: {verificacao.valor}")

    def test_tabelas(self):
        """Test the sampled zero-dynamics and orbit tables."""
        tabela = ServicoDinamicaZero.amostrar(self.dinamica_zero, 101)
        self.assertEqual(tabela.shape, (101, 5))
        np.testing.assert_allclose(tabela[[0, -1], 0], self.dinamica_zero.intervalo)
        self.assertTrue(np.all(tabela[:, 3] > 0.0))

        curva = ServicoDinamicaZero.amostrar_orbita(self.orbita, 101)
        self.assertEqual(curva.shape, (101, 2))
        self.assertTrue(np.all(curva[:, 1] < 0.0))
