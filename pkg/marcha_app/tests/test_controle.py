"""
Tests for the constraint-enforcing control and the impulse realizations.
"""
from dataclasses import replace
from types import SimpleNamespace
from unittest.mock import patch

import numpy as np
from django.test import SimpleTestCase
from scipy.integrate import solve_ivp

from marcha_app.core.excecoes import ExcecaoAltoGanhoEstagnado
from marcha_app.dominio import Estado
from marcha_app.services.servico_controle import ServicoControle
from marcha_app.services.servico_dinamica_zero import ServicoDinamicaZero
from marcha_app.services.servico_hibrido import ServicoHibrido
from marcha_app.services.servico_vhc import ServicoVhc
from marcha_app.tests.auxiliares import configuracao_padrao, marcha_tabela


class ServicoControleTest(SimpleTestCase):
    """Tests for ServicoControle."""

    def setUp(self):
        """Set up test data."""
        self.configuracao = configuracao_padrao()
        self.bipede = self.configuracao.bipede
        self.ganhos = self.configuracao.ganhos
        self.marcha = marcha_tabela()

    def _estado_deslocado(self, q2: float, dq2: float, deslocamento: np.ndarray) -> Estado:
        sobre = ServicoDinamicaZero.levantar_para_variedade(self.marcha, q2, dq2)
        return Estado(q1=sobre.q1 + deslocamento, q2=q2, dq1=sobre.dq1, dq2=dq2)

    def _aceleracao_rho(self, estado: Estado) -> np.ndarray:
        derivada = ServicoControle.dinamica_malha_fechada(self.marcha, self.bipede, self.ganhos, estado.como_vetor())
        ddq = derivada[5:]
        return (
            ddq[:4]
            - ServicoVhc.phi_linha(self.marcha, estado.q2) * ddq[4]
            - ServicoVhc.phi_duas_linhas(self.marcha, estado.q2) * estado.dq2 ** 2
        )

    def test_saida_linearizada(self):
        """Test ddrho = -kd drho - kp rho for an offset off the manifold."""
        deslocamento = np.array([0.0, 0.01, 0.0, -0.02])
        estado = self._estado_deslocado(0.1, -5.0, deslocamento)
        np.testing.assert_allclose(self._aceleracao_rho(estado), -750.0 * deslocamento, atol=1e-8)

    def test_sobre_a_variedade(self):
        """Test the manifold is invariant under the control."""
        estado = ServicoDinamicaZero.levantar_para_variedade(self.marcha, -0.2, -4.0)
        np.testing.assert_allclose(self._aceleracao_rho(estado), 0.0, atol=1e-8)

    def test_convergencia_para_a_variedade(self):
        """Test rho follows the closed-form second-order decay."""
        delta = 0.01
        estado = self._estado_deslocado(0.1, -5.0, np.array([delta, 0.0, 0.0, 0.0]))
        tempos = np.linspace(0.0, 0.05, 11)
        solucao = solve_ivp(
            lambda t, x: ServicoControle.dinamica_malha_fechada(self.marcha, self.bipede, self.ganhos, x),
            (0.0, 0.05),
            estado.como_vetor(),
            method='DOP853',
            rtol=1e-10,
            atol=1e-12,
            t_eval=tempos,
        )
        self.assertTrue(solucao.success)

        # rho'' + 25 rho' + 750 rho = 0 com rho(0) = delta, rho'(0) = 0
        amortecimento = 12.5
        frequencia = np.sqrt(750.0 - amortecimento ** 2)
        for t, x in zip(solucao.t, solucao.y.T):
            rho, _ = ServicoVhc.residuo_variedade(self.marcha, Estado.de_vetor(x))
            esperado = delta * np.exp(-amortecimento * t) * (
                np.cos(frequencia * t) + amortecimento / frequencia * np.sin(frequencia * t)
            )
            self.assertAlmostEqual(rho[0], esperado, delta=1e-6, msg=f"Failed for t: {t}")
            np.testing.assert_allclose(rho[1:], 0.0, atol=1e-6)

    def test_controle_continuo_dimensao(self):
        """Test u_c has one torque per actuated joint."""
        estado = self._estado_deslocado(0.0, -5.0, np.array([0.01, 0.0, 0.0, 0.0]))
        u = ServicoControle.controle_continuo(self.marcha, self.bipede, self.ganhos, estado)
        self.assertEqual(u.shape, (4,))
        self.assertTrue(np.all(np.isfinite(u)))

    def test_impulso_ideal_delega_ao_mapa(self):
        """Test the ideal impulse is the hybrid velocity jump."""
        estado = ServicoDinamicaZero.levantar_para_variedade(self.marcha, 0.2, -5.0)
        impulso = np.array([0.1, -0.2, 0.05, 0.0])
        np.testing.assert_array_equal(
            ServicoControle.aplicar_impulso_ideal(self.bipede, estado, impulso).dq,
            ServicoHibrido.aplicar_salto_impulsivo(self.bipede, estado, impulso).dq,
        )

    def test_impulso_alto_ganho(self):
        """Test the high-gain realization reaches the ideal post-impulse velocities."""
        estado = ServicoDinamicaZero.levantar_para_variedade(self.marcha, 0.2, -5.0)
        ideal = ServicoControle.aplicar_impulso_ideal(self.bipede, estado, np.array([0.1, -0.1, 0.05, 0.02]))
        alto_ganho = self.configuracao.alto_ganho

        trecho = ServicoControle.aplicar_impulso_alto_ganho(
            self.bipede, alto_ganho, estado, ideal.dq1, tempo_inicial=1.0
        )
        depois = trecho.estado_final

        self.assertEqual(trecho.evento, 'impulso')
        self.assertLessEqual(np.linalg.norm(depois.dq1 - ideal.dq1), 1.01 * alto_ganho.tolerancia_parada)
        limite = 100 * alto_ganho.mu * abs(np.log(alto_ganho.tolerancia_parada))
        self.assertGreater(trecho.tempo_final, 1.0)
        self.assertLess(trecho.tempo_final - 1.0, limite)
        # As posições só andam com as velocidades durante o trecho curto
        duracao = trecho.tempo_final - 1.0
        self.assertLess(
            np.linalg.norm(depois.q - estado.q), duracao * (np.linalg.norm(estado.dq) + np.linalg.norm(ideal.dq))
        )

    def test_impulso_alto_ganho_ja_no_alvo(self):
        """Test an already-reached target returns immediately."""
        estado = ServicoDinamicaZero.levantar_para_variedade(self.marcha, 0.2, -5.0)
        trecho = ServicoControle.aplicar_impulso_alto_ganho(
            self.bipede, self.configuracao.alto_ganho, estado, estado.dq1, tempo_inicial=0.5
        )
        self.assertIs(trecho.estado_final, estado)
        self.assertEqual(trecho.tempo_final, 0.5)

    def test_impulso_alto_ganho_estagnado(self):
        """Test a high-gain run that never reaches the target."""
        estado = ServicoDinamicaZero.levantar_para_variedade(self.marcha, 0.2, -5.0)
        sem_evento = SimpleNamespace(status=0, message='fim do intervalo')
        with patch('marcha_app.services.servico_controle.solve_ivp', return_value=sem_evento):
            with self.assertRaises(ExcecaoAltoGanhoEstagnado):
                ServicoControle.aplicar_impulso_alto_ganho(
                    self.bipede, self.configuracao.alto_ganho, estado, estado.dq1 + 1.0
                )

    def test_impulso_alto_ganho_sem_erro_estacionario(self):
        """Test the actuated velocity error decays at rate Lambda / mu against gravity."""
        estado = ServicoDinamicaZero.levantar_para_variedade(self.marcha, 0.2, -5.0)
        ideal = ServicoControle.aplicar_impulso_ideal(self.bipede, estado, np.array([0.1, -0.1, 0.05, 0.02]))
        alto_ganho = self.configuracao.alto_ganho

        trecho = ServicoControle.aplicar_impulso_alto_ganho(self.bipede, alto_ganho, estado, ideal.dq1)

        # ||e(t)|| = ||e(0)|| exp(-t / mu) com Lambda = I
        salto = np.linalg.norm(ideal.dq1 - estado.dq1)
        esperado = alto_ganho.mu * np.log(salto / alto_ganho.tolerancia_parada)
        self.assertAlmostEqual(trecho.tempo_final, esperado, delta=0.01 * esperado)

    def test_alto_ganho_converge_para_o_ideal(self):
        """Test the high-gain post-state approaches the ideal jump to first order in mu."""
        estado = ServicoDinamicaZero.levantar_para_variedade(self.marcha, 0.2, -5.0)
        ideal = ServicoControle.aplicar_impulso_ideal(self.bipede, estado, np.array([0.1, -0.1, 0.05, 0.02]))

        diferencas = []
        for mu in (5e-4, 5e-5):
            alto_ganho = replace(self.configuracao.alto_ganho, mu=mu)
            depois = ServicoControle.aplicar_impulso_alto_ganho(self.bipede, alto_ganho, estado, ideal.dq1).estado_final
            diferencas.append(np.linalg.norm(depois.como_vetor() - ideal.como_vetor()))

        self.assertLess(diferencas[0], 1000 * 5e-4)
        self.assertLess(diferencas[1], 0.3 * diferencas[0])
