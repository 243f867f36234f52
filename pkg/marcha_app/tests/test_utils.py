"""
Tests for utility functions.
"""
import logging
import tempfile
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase

from marcha_app.core.utilitarios import (
    diferenca_angular,
    normalizar_angulo,
    registrar_evento,
    salvar_csv,
    salvar_matriz,
)


class UtilsTest(SimpleTestCase):
    """Tests for utility functions."""

    def test_normalizar_angulo(self):
        """Test angle wrapping into (-pi, pi]."""
        test_cases = [
            (0.0, 0.0),
            (3 * np.pi / 2, -np.pi / 2),
            (-np.pi, np.pi),
            (np.pi, np.pi),
            (5 * np.pi, np.pi),
            (-0.3, -0.3),
        ]

        for angulo, esperado in test_cases:
            resultado = normalizar_angulo(angulo)
            self.assertAlmostEqual(resultado, esperado, places=12, msg=f"Failed for input: {angulo}")

    def test_normalizar_angulo_array(self):
        """Test angle wrapping keeps array shape."""
        resultado = normalizar_angulo(np.array([2 * np.pi + 0.1, -2 * np.pi - 0.1]))
        self.assertIsInstance(resultado, np.ndarray)
        np.testing.assert_allclose(resultado, [0.1, -0.1], atol=1e-12)

    def test_diferenca_angular_atravessa_pi(self):
        """Test wrapped difference across the +-pi seam."""
        # Ângulos vizinhos de lados opostos da costura
        self.assertAlmostEqual(diferenca_angular(np.pi - 0.1, -np.pi + 0.1), -0.2, places=12)
        self.assertAlmostEqual(diferenca_angular(0.5, 0.2), 0.3, places=12)

    def test_salvar_matriz_reproduz_valores(self):
        """Test matrix text files reload bit-for-bit."""
        matriz = np.random.default_rng(7).normal(size=(3, 4))
        with tempfile.TemporaryDirectory() as diretorio:
            caminho = Path(diretorio) / 'K.txt'
            salvar_matriz(caminho, matriz, '%.17g')
            np.testing.assert_array_equal(np.loadtxt(caminho), matriz)

    def test_salvar_csv_cabecalho(self):
        """Test CSV header and row count."""
        with tempfile.TemporaryDirectory() as diretorio:
            caminho = Path(diretorio) / 'tabela.csv'
            salvar_csv(caminho, ['q2', 'dq2'], np.array([[0.1, -1.0], [0.2, -2.0]]), '%.12g')
            linhas = caminho.read_text().splitlines()
        self.assertEqual(linhas[0], 'q2,dq2')
        self.assertEqual(len(linhas), 3)
        self.assertEqual(linhas[1], '0.1,-1')

    def test_registrar_evento_estruturado(self):
        """Test structured logging serializes numpy arrays."""
        logger = logging.getLogger('marcha_app.teste')
        with self.assertLogs(logger, level='INFO') as registros:
            registrar_evento("warning", "Evento de teste", logger, impulso=np.array([1.0, 2.0]))

        self.assertEqual(registros.records[0].levelname, 'WARNING')
        self.assertIn('Evento de teste', registros.output[0])
        self.assertIn('STRUCTURED_LOG', registros.output[1])
        self.assertIn('[1.0, 2.0]', registros.output[1])
