"""
Funções utilitárias compartilhadas.
Funções reutilizáveis usadas em toda a aplicação.
"""
import logging
from pathlib import Path
from typing import Optional, Any, Sequence

import numpy as np
from django.utils import timezone

logger = logging.getLogger(__name__)


def normalizar_angulo(angulo):
    """
    Leva ângulos para o intervalo (-pi, pi].

    Args:
        angulo: Escalar ou array de ângulos (rad)

    Returns:
        Ângulo(s) equivalente(s) módulo 2*pi

    Exemplo:
        3*pi/2 -> -pi/2 ; -pi -> pi
    """
    resultado = np.pi - np.mod(np.pi - np.asarray(angulo, dtype=float), 2 * np.pi)
    if np.ndim(resultado) == 0:
        return float(resultado)
    return resultado


def diferenca_angular(a, b):
    """Diferença a - b normalizada para (-pi, pi]."""
    return normalizar_angulo(np.asarray(a, dtype=float) - np.asarray(b, dtype=float))


def registrar_evento(
    nivel: str,
    mensagem: str,
    instancia_logger: Optional[logging.Logger] = None,
    **metadados: Any
) -> None:
    """
    Registra um evento com metadados estruturados.

    Args:
        nivel: Nível de log (info, warning, error, etc.)
        mensagem: Mensagem legível
        instancia_logger: Instância do logger (padrão: logger do módulo)
        **metadados: Metadados adicionais para log
    """
    log = instancia_logger or logger

    try:
        # Log da mensagem legível
        getattr(log, nivel)(mensagem)

        # Log de metadados estruturados
        dados_estruturados = {
            "timestamp": timezone.now().isoformat(),
            "mensagem": mensagem,
            "metadados": {chave: _serializavel(valor) for chave, valor in metadados.items()}
        }
        log.info(f"STRUCTURED_LOG: {dados_estruturados}")
    except Exception as e:
        log.exception(f"Erro ao registrar evento: {e}")


def _serializavel(valor: Any) -> Any:
    """Converte arrays numpy em listas para o log estruturado."""
    if isinstance(valor, np.ndarray):
        return valor.tolist()
    if isinstance(valor, np.generic):
        return valor.item()
    return valor


def salvar_matriz(caminho: Path, matriz: np.ndarray, formato: str) -> None:
    """
    Grava matriz em texto: uma linha por linha da matriz, valores separados por espaço.

    Args:
        caminho: Arquivo de destino
        matriz: Vetor ou matriz
        formato: Formato numérico (ex.: '%.17g')
    """
    dados = np.atleast_2d(np.asarray(matriz, dtype=float))
    np.savetxt(caminho, dados, fmt=formato, delimiter=' ')


def salvar_csv(caminho: Path, cabecalho: Sequence[str], linhas: np.ndarray, formato: str) -> None:
    """
    Grava tabela CSV com cabeçalho na primeira linha.

    Args:
        caminho: Arquivo de destino
        cabecalho: Nomes das colunas
        linhas: Array (linhas x colunas)
        formato: Formato numérico
    """
    dados = np.asarray(linhas, dtype=float).reshape(-1, len(cabecalho))
    np.savetxt(caminho, dados, fmt=formato, delimiter=',', header=','.join(cabecalho), comments='')
